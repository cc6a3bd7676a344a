#pragma once

#include "cyclepatrol/consensus.hpp"
#include "cyclepatrol/engine.hpp"
#include "cyclepatrol/errors.hpp"
#include "cyclepatrol/fleet.hpp"
#include "cyclepatrol/io.hpp"
#include "cyclepatrol/metrics.hpp"
#include "cyclepatrol/parallel.hpp"
#include "cyclepatrol/random.hpp"
#include "cyclepatrol/rounds.hpp"
#include "cyclepatrol/scenario.hpp"
#include "cyclepatrol/simulator.hpp"
#include "cyclepatrol/suites.hpp"
#include "cyclepatrol/sweep.hpp"
#include "cyclepatrol/time_form.hpp"
#include "cyclepatrol/word_checks.hpp"
#include "cyclepatrol/words.hpp"
