#ifndef COSSU_COSSU_HPP
#define COSSU_COSSU_HPP

#include "cossu/closed_miner.hpp"
#include "cossu/coding.hpp"
#include "cossu/encoding.hpp"
#include "cossu/error.hpp"
#include "cossu/evaluation.hpp"
#include "cossu/model_io.hpp"
#include "cossu/optimizer.hpp"
#include "cossu/rule.hpp"
#include "cossu/selector.hpp"
#include "cossu/sequence.hpp"

#endif // COSSU_COSSU_HPP
