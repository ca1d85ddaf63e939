#pragma once

#include "hpfilt/bench.hpp"
#include "hpfilt/errors.hpp"
#include "hpfilt/filters.hpp"
#include "hpfilt/io.hpp"
#include "hpfilt/linalg.hpp"
#include "hpfilt/sohp.hpp"
