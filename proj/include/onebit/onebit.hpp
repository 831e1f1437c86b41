#pragma once

#include "onebit/numerics.hpp"
#include "onebit/parallel.hpp"
#include "onebit/system_model.hpp"
#include "onebit/bussgang.hpp"
#include "onebit/estimation.hpp"
#include "onebit/receiver_rates.hpp"
#include "onebit/experiments.hpp"
#include "onebit/validation.hpp"
