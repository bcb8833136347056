#pragma once

#include "fourbody/errors.hpp"
#include "fourbody/core.hpp"
#include "fourbody/criterion.hpp"
#include "fourbody/random.hpp"
#include "fourbody/hardy.hpp"
#include "fourbody/quadrature.hpp"
#include "fourbody/linalg.hpp"
#include "fourbody/chain_verify.hpp"
#include "fourbody/effpot.hpp"
#include "fourbody/twocenter.hpp"
#include "fourbody/ecg.hpp"
#include "fourbody/io.hpp"
