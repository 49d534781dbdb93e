#pragma once

#include "nndc/binary_codes.hpp"
#include "nndc/contrast.hpp"
#include "nndc/dataset.hpp"
#include "nndc/error.hpp"
#include "nndc/format.hpp"
#include "nndc/intrinsic.hpp"
#include "nndc/io.hpp"
#include "nndc/knn.hpp"
#include "nndc/linalg.hpp"
#include "nndc/lsh.hpp"
#include "nndc/metric.hpp"
#include "nndc/moments.hpp"
#include "nndc/normal.hpp"
#include "nndc/parallel.hpp"
#include "nndc/random.hpp"
#include "nndc/recall.hpp"
#include "nndc/synth.hpp"
