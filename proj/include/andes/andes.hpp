#pragma once

// Umbrella header for the corpus toolkit.

#include "andes/augment.hpp"
#include "andes/chrf.hpp"
#include "andes/corpus.hpp"
#include "andes/error.hpp"
#include "andes/filters.hpp"
#include "andes/normalize.hpp"
#include "andes/stats.hpp"
#include "andes/unicode.hpp"

namespace andes {
inline constexpr const char* kVersion = "0.1.0";
}
