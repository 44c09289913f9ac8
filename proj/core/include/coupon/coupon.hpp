#pragma once

#include "coupon/automata.hpp"
#include "coupon/curve.hpp"
#include "coupon/errors.hpp"
#include "coupon/format.hpp"
#include "coupon/rng.hpp"
#include "coupon/sampler.hpp"
#include "coupon/specialfn.hpp"
#include "coupon/stirling.hpp"
