#pragma once

#include "neurowise/service/orchestrator.hpp"

namespace httplib {
class Server;
}

namespace neurowise::service {

/// Routes:
///   POST /sessions                 {stratum, scenario_id} -> gated session view (201)
///   POST /sessions/{id}/messages   {text} -> TurnResult
///   POST /sessions/{id}/end        -> gated session view
///   GET  /sessions/{id}            -> gated session view
///   GET  /sessions/{id}/export     -> JSONL, internal view
///   GET  /healthz                  -> {"status": "ok"}
/// Errors are {"error": kind, "message": text} with 400/404/409/502/500.
void mount_routes(httplib::Server& server, Orchestrator& orchestrator);

/// Blocks serving on config host:port; sweeps idle sessions once a minute.
int serve(Orchestrator& orchestrator);

}  // namespace neurowise::service
