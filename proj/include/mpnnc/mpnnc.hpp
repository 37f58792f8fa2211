#pragma once

#include "mpnnc/activation.hpp"
#include "mpnnc/approx.hpp"
#include "mpnnc/compiler.hpp"
#include "mpnnc/equivalence.hpp"
#include "mpnnc/errors.hpp"
#include "mpnnc/expr.hpp"
#include "mpnnc/fixtures.hpp"
#include "mpnnc/graph.hpp"
#include "mpnnc/interpreter.hpp"
#include "mpnnc/interval.hpp"
#include "mpnnc/mpnn.hpp"
#include "mpnnc/parser.hpp"
#include "mpnnc/random.hpp"
#include "mpnnc/sampling.hpp"
#include "mpnnc/translate.hpp"
