#pragma once

#include "berglab/bergman.hpp"
#include "berglab/checks.hpp"
#include "berglab/common.hpp"
#include "berglab/dictionary.hpp"
#include "berglab/ensembles.hpp"
#include "berglab/envelope.hpp"
#include "berglab/extremal.hpp"
#include "berglab/grid.hpp"
#include "berglab/io.hpp"
#include "berglab/measure.hpp"
#include "berglab/models.hpp"
#include "berglab/qe.hpp"
#include "berglab/rng.hpp"
#include "berglab/space.hpp"
#include "berglab/toeplitz.hpp"
#include "berglab/weight.hpp"
#include "berglab/zeros.hpp"
