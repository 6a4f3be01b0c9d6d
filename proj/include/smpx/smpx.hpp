#pragma once

#include "smpx/error.hpp"
#include "smpx/json.hpp"
#include "smpx/laurent.hpp"
#include "smpx/model.hpp"
#include "smpx/oracle.hpp"
#include "smpx/parallel.hpp"
#include "smpx/pipeline.hpp"
#include "smpx/rational.hpp"
#include "smpx/reduce.hpp"
