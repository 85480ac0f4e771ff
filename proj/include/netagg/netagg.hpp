#pragma once

#include "netagg/aggregate.hpp"
#include "netagg/description.hpp"
#include "netagg/error.hpp"
#include "netagg/eval_core.hpp"
#include "netagg/format.hpp"
#include "netagg/hierarchy.hpp"
#include "netagg/network.hpp"
#include "netagg/priority.hpp"
