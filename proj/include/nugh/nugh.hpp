#pragma once

#include "nugh/errors.hpp"
#include "nugh/special_fn.hpp"
#include "nugh/quadrature.hpp"
#include "nugh/random.hpp"
#include "nugh/fft.hpp"
#include "nugh/gh.hpp"
#include "nugh/nu_families.hpp"
#include "nugh/nu_transform.hpp"
#include "nugh/inversion.hpp"
#include "nugh/montecarlo.hpp"
#include "nugh/fitting.hpp"
#include "nugh/check_suite.hpp"
#include "nugh/report.hpp"
#include "nugh/version.hpp"
