#pragma once

#include <vrmc/auto_integrator.hpp>
#include <vrmc/bench.hpp>
#include <vrmc/budget.hpp>
#include <vrmc/compensated_sum.hpp>
#include <vrmc/error.hpp>
#include <vrmc/estimators.hpp>
#include <vrmc/integrand.hpp>
#include <vrmc/interp.hpp>
#include <vrmc/oracle.hpp>
#include <vrmc/partition.hpp>
#include <vrmc/quadrature.hpp>
#include <vrmc/rng.hpp>
#include <vrmc/scheme.hpp>
