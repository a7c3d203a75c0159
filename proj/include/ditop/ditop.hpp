#pragma once

#include "ditop/cubecore.hpp"
#include "ditop/ditc.hpp"
#include "ditop/dmap.hpp"
#include "ditop/equivcheck.hpp"
#include "ditop/error.hpp"
#include "ditop/fixtures.hpp"
#include "ditop/io.hpp"
#include "ditop/natsys.hpp"
#include "ditop/pvlang.hpp"
#include "ditop/traceclass.hpp"
#include "ditop/zhom.hpp"
