#pragma once

#include "fracdiff/caputo.hpp"
#include "fracdiff/error.hpp"
#include "fracdiff/grid.hpp"
#include "fracdiff/harness.hpp"
#include "fracdiff/problems.hpp"
#include "fracdiff/reference.hpp"
#include "fracdiff/schemes.hpp"
#include "fracdiff/stability.hpp"
#include "fracdiff/tridiag.hpp"
#include "fracdiff/weight_provider.hpp"
