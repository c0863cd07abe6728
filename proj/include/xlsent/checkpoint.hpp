#pragma once

// Text checkpoint format shared by every trained artifact:
//
//   xlsent-checkpoint 1
//   kind <sentence|sent|no-mprime|no-proj|split|target-only|context-only|mapping>
//   dims <d> <d'> <h> <o>
//   scalar <name> <value>            (zero or more)
//   matrix <name> <rows> <cols>
//   <row-major values, one row per line>
//   ...
//   end
//
// Values are written in shortest round-trip form, so load(save(x)) == x.

#include <iosfwd>
#include <map>
#include <string>

#include "xlsent/blse.hpp"
#include "xlsent/mapping.hpp"
#include "xlsent/targeted.hpp"

namespace xlsent {

struct Checkpoint {
  std::string kind;
  std::size_t d = 0;
  std::size_t dprime = 0;
  std::size_t h = 0;
  std::size_t o = 0;
  std::map<std::string, double> scalars;
  std::map<std::string, Matrix> matrices;

  const Matrix& matrix(const std::string& name) const;
};

void write_checkpoint(const Checkpoint& checkpoint, std::ostream& out);
Checkpoint read_checkpoint(std::istream& in);

// `kind` overrides the variant-derived tag (e.g. "sent" for the sentence
// model behind the Sent baseline).
Checkpoint to_checkpoint(const BlseParams& params, std::string kind = {});
Checkpoint to_checkpoint(const TargetedParams& params);
Checkpoint to_checkpoint(const MappingMatrix& mapping);

BlseParams blse_from_checkpoint(const Checkpoint& checkpoint);
TargetedParams targeted_from_checkpoint(const Checkpoint& checkpoint);
MappingMatrix mapping_from_checkpoint(const Checkpoint& checkpoint);

bool is_targeted_kind(const std::string& kind);

}  // namespace xlsent
