#pragma once

#include "immwit/experiments.hpp"
#include "immwit/io.hpp"
#include "immwit/linalg.hpp"
#include "immwit/maps.hpp"
#include "immwit/optimizer.hpp"
#include "immwit/random.hpp"
#include "immwit/symgroup.hpp"
