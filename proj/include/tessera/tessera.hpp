#pragma once

// Umbrella header for the tessera library: fixed-centroid weighted Voronoi
// clustering and descriptive analytics for multi-variable entity panels.

#include "tessera/analytics.hpp"
#include "tessera/clustering.hpp"
#include "tessera/config.hpp"
#include "tessera/dataset.hpp"
#include "tessera/error.hpp"
#include "tessera/normalize.hpp"
#include "tessera/outlier.hpp"
#include "tessera/pipeline.hpp"
#include "tessera/report.hpp"
#include "tessera/stats.hpp"
#include "tessera/synth.hpp"
#include "tessera/variables.hpp"
#include "tessera/weights.hpp"
