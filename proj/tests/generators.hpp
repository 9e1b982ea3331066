#pragma once

#include "cordfol/generators.hpp"

namespace gen = cordfol::gen;
