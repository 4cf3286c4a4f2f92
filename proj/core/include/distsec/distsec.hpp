#pragma once

#include "distsec/alphabet.hpp"
#include "distsec/analysis.hpp"
#include "distsec/bin_statistics.hpp"
#include "distsec/csv.hpp"
#include "distsec/encoders.hpp"
#include "distsec/error.hpp"
#include "distsec/keyed_code.hpp"
#include "distsec/multisource.hpp"
#include "distsec/numeric.hpp"
#include "distsec/random.hpp"
#include "distsec/search.hpp"
#include "distsec/serialization.hpp"
#include "distsec/simulation.hpp"
