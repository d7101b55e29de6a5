#pragma once

#include <string_view>

#include "cloudadl/ast.hpp"
#include "cloudadl/diagnostic.hpp"
#include "cloudadl/topology.hpp"

namespace cloudadl {

/// Well-formedness of a parsed model. Empty iff every rule holds:
///   references resolve (E_UNRESOLVED)
///   connector endpoints carry the same message type (E_TYPE_MISMATCH)
///   connectors go ownIn->subIn, subOut->subIn or subOut->ownOut (E_DIRECTION)
///   endpoints name own ports or immediate subcomponent ports (E_ENCAPSULATION)
///   each (source, target) pair is connected once (E_DUP_CONNECT)
///   atomic types have a behavior, decomposed types none (E_BEHAVIOR)
///   gates name declared connectors (E_GATE_REF)
///   no type contains itself transitively (E_RECURSION)
///   only out-ports are replicating (E_REPL_PORT)
/// plus: replicating subcomponents are atomic (E_REPL_DECOMPOSED).
Diagnostics check(const ArchitectureModel& model);

/// Recursively instantiates `rootType` and fuses connector chains through
/// supervisor ports into atomic-to-atomic channels. Requires check(model) to
/// be empty; throws std::invalid_argument for an unknown root type.
RuntimeTopology elaborate(const ArchitectureModel& model, std::string_view rootType);

}  // namespace cloudadl
