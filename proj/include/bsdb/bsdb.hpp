#pragma once

// Umbrella header for the whole library.

#include "bsdb/baselines.hpp"
#include "bsdb/blocks.hpp"
#include "bsdb/config.hpp"
#include "bsdb/datacube.hpp"
#include "bsdb/dbsdb.hpp"
#include "bsdb/eigensolver.hpp"
#include "bsdb/errors.hpp"
#include "bsdb/histogram.hpp"
#include "bsdb/image_io.hpp"
#include "bsdb/mask.hpp"
#include "bsdb/mat.hpp"
#include "bsdb/model_io.hpp"
#include "bsdb/report.hpp"
#include "bsdb/sbsdb.hpp"
#include "bsdb/sliding_window.hpp"
#include "bsdb/spectral.hpp"
#include "bsdb/synthetic.hpp"
