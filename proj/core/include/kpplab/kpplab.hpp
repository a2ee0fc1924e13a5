#pragma once

#include "kpplab/analysis.hpp"
#include "kpplab/csv.hpp"
#include "kpplab/error.hpp"
#include "kpplab/grid.hpp"
#include "kpplab/kernels.hpp"
#include "kpplab/model.hpp"
#include "kpplab/solver.hpp"
#include "kpplab/tumor.hpp"
