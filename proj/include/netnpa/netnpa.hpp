#pragma once

#include "netnpa/factorisation.hpp"
#include "netnpa/gns.hpp"
#include "netnpa/moment.hpp"
#include "netnpa/network.hpp"
#include "netnpa/scenario.hpp"
#include "netnpa/sdp.hpp"
#include "netnpa/word.hpp"
