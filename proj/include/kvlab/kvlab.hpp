#pragma once

#include "kvlab/analysis.hpp"
#include "kvlab/certificates.hpp"
#include "kvlab/cli.hpp"
#include "kvlab/comparison.hpp"
#include "kvlab/config.hpp"
#include "kvlab/error.hpp"
#include "kvlab/forcing.hpp"
#include "kvlab/functionals.hpp"
#include "kvlab/grid.hpp"
#include "kvlab/params.hpp"
#include "kvlab/report.hpp"
#include "kvlab/simulator.hpp"
#include "kvlab/tridiagonal.hpp"
