#pragma once

#include "algebra.hpp"
#include "coloring.hpp"
#include "constructive.hpp"
#include "core.hpp"
#include "largeness.hpp"
#include "pattern_ast.hpp"
#include "patterns.hpp"
#include "search.hpp"
#include "structure.hpp"
#include "structure_io.hpp"
#include "subset.hpp"
