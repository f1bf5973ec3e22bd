#pragma once

// Convenience umbrella for the whole library.

#include "eps/dct.hpp"
#include "eps/features.hpp"
#include "eps/frame.hpp"
#include "eps/frame_io.hpp"
#include "eps/heatmap.hpp"
#include "eps/manifest.hpp"
#include "eps/parallel.hpp"
#include "eps/pgm.hpp"
#include "eps/sampler.hpp"
