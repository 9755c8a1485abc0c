#ifndef PREDRISK_PREDRISK_HPP
#define PREDRISK_PREDRISK_HPP

#define PREDRISK_VERSION "0.1.0"

#include "predrisk/bayes.hpp"
#include "predrisk/bounds.hpp"
#include "predrisk/model.hpp"
#include "predrisk/prior.hpp"
#include "predrisk/quadrature.hpp"
#include "predrisk/risk.hpp"
#include "predrisk/rng.hpp"
#include "predrisk/sampling.hpp"
#include "predrisk/specfun.hpp"

#endif // PREDRISK_PREDRISK_HPP
