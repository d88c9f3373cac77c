#pragma once

// Single entry point: the order operations (tree.hpp) are declared in
// node.hpp but defined later, so include the library through this header.

#include "chain.hpp"
#include "errors.hpp"
#include "family.hpp"
#include "io.hpp"
#include "newton.hpp"
#include "node.hpp"
#include "poly.hpp"
#include "rational.hpp"
#include "tree.hpp"
#include "value_group.hpp"
