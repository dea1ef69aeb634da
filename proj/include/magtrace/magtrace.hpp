#pragma once

#include "magtrace/density.hpp"
#include "magtrace/distributions.hpp"
#include "magtrace/error.hpp"
#include "magtrace/fit.hpp"
#include "magtrace/flow.hpp"
#include "magtrace/geometry.hpp"
#include "magtrace/lattice.hpp"
#include "magtrace/probe.hpp"
#include "magtrace/quadrature.hpp"
#include "magtrace/series.hpp"
#include "magtrace/spectra.hpp"
#include "magtrace/weyl.hpp"
