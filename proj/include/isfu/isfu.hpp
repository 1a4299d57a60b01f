// Umbrella header.
#pragma once

#include "isfu/isa.hpp"
#include "isfu/threads.hpp"
#include "isfu/unit.hpp"
#include "isfu/services.hpp"
#include "isfu/exec.hpp"
#include "isfu/finfu.hpp"
#include "isfu/funit.hpp"
#include "isfu/natfu.hpp"
