#pragma once

#include "sheathlab/background.hpp"
#include "sheathlab/core.hpp"
#include "sheathlab/diagnostics.hpp"
#include "sheathlab/epsolve.hpp"
#include "sheathlab/errors.hpp"
#include "sheathlab/expansion.hpp"
#include "sheathlab/harness.hpp"
#include "sheathlab/numerics.hpp"
#include "sheathlab/sheath.hpp"
