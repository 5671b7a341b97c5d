#pragma once

#include "nsmoo/continuation.hpp"
#include "nsmoo/core.hpp"
#include "nsmoo/descent.hpp"
#include "nsmoo/inverse.hpp"
#include "nsmoo/io.hpp"
#include "nsmoo/minnorm.hpp"
#include "nsmoo/problems.hpp"
#include "nsmoo/scalarize.hpp"
#include "nsmoo/subdivision.hpp"
