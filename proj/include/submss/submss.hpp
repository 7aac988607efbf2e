#ifndef SUBMSS_SUBMSS_HPP
#define SUBMSS_SUBMSS_HPP

#include "submss/aqm_queue.hpp"
#include "submss/analysis.hpp"
#include "submss/engine.hpp"
#include "submss/link.hpp"
#include "submss/metrics.hpp"
#include "submss/pacer.hpp"
#include "submss/packet.hpp"
#include "submss/random.hpp"
#include "submss/scenario.hpp"
#include "submss/scenario_config.hpp"
#include "submss/sim_time.hpp"
#include "submss/sweep.hpp"
#include "submss/tcp_receiver.hpp"
#include "submss/tcp_sender.hpp"

#endif  // SUBMSS_SUBMSS_HPP
