#pragma once

#include "error.hpp"
#include "graph.hpp"
#include "spectral.hpp"
#include "kernels.hpp"
#include "features.hpp"
#include "rls.hpp"
#include "analysis.hpp"
#include "data.hpp"
#include "schema.hpp"
#include "experiment.hpp"
#include "io.hpp"
