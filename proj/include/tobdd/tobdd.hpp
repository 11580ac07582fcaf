// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "tobdd/atom_map.hpp"
#include "tobdd/bdd.hpp"
#include "tobdd/compiler.hpp"
#include "tobdd/enumerator.hpp"
#include "tobdd/errors.hpp"
#include "tobdd/formula.hpp"
#include "tobdd/linear_atom.hpp"
#include "tobdd/oracle.hpp"
#include "tobdd/rational.hpp"
#include "tobdd/smtlib.hpp"
#include "tobdd/theory_solver.hpp"
