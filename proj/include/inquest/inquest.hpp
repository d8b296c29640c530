#pragma once

#include "inquest/core.hpp"
#include "inquest/embedding.hpp"
#include "inquest/entropy.hpp"
#include "inquest/environments.hpp"
#include "inquest/error.hpp"
#include "inquest/feedback.hpp"
#include "inquest/metrics.hpp"
#include "inquest/policies.hpp"
#include "inquest/question_parser.hpp"
#include "inquest/retrievers.hpp"
#include "inquest/rewards.hpp"
#include "inquest/rng.hpp"
#include "inquest/runner.hpp"
#include "inquest/service.hpp"
#include "inquest/synth.hpp"
