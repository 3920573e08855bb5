#pragma once

#include "config.hpp"
#include "diagrams.hpp"
#include "exact.hpp"
#include "growth.hpp"
#include "qoperators.hpp"
#include "repsoq.hpp"
#include "weyl.hpp"
