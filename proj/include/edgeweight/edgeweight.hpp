#pragma once

// Spectral weights of Jacobi matrices and half-line Schrödinger operators
// with monotone parameters near the edge of the spectrum.

#include "edgeweight/errors.hpp"
#include "edgeweight/numeric.hpp"
#include "edgeweight/quadrature.hpp"
#include "edgeweight/params.hpp"
#include "edgeweight/phase.hpp"
#include "edgeweight/recurrence.hpp"
#include "edgeweight/wkb.hpp"
#include "edgeweight/transfer.hpp"
#include "edgeweight/asymptotics.hpp"
#include "edgeweight/carmona.hpp"
#include "edgeweight/continuum.hpp"
#include "edgeweight/verify.hpp"
