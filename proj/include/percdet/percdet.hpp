#ifndef PERCDET_PERCDET_HPP
#define PERCDET_PERCDET_HPP

#include "percdet/cluster.hpp"
#include "percdet/crossing.hpp"
#include "percdet/detector.hpp"
#include "percdet/error.hpp"
#include "percdet/image_io.hpp"
#include "percdet/lab.hpp"
#include "percdet/model.hpp"
#include "percdet/noise_model.hpp"
#include "percdet/parallel.hpp"
#include "percdet/random.hpp"
#include "percdet/raster.hpp"
#include "percdet/report.hpp"
#include "percdet/stats.hpp"
#include "percdet/thresholding.hpp"
#include "percdet/version.hpp"

#endif  // PERCDET_PERCDET_HPP
