#pragma once

#include "drs/bench.hpp"
#include "drs/dataset.hpp"
#include "drs/ensemble.hpp"
#include "drs/measures.hpp"
#include "drs/region.hpp"
#include "drs/report.hpp"
#include "drs/rng.hpp"
#include "drs/selection.hpp"
#include "drs/tree.hpp"
