#include "xlsent/checkpoint.hpp"

#include <istream>
#include <ostream>

#include "xlsent/errors.hpp"
#include "xlsent/text.hpp"

namespace xlsent {

namespace {
constexpr const char* kMagic = "xlsent-checkpoint";
constexpr int kVersion = 1;
}  // namespace

const Matrix& Checkpoint::matrix(const std::string& name) const {
  auto it = matrices.find(name);
  if (it == matrices.end()) throw FormatError("checkpoint: missing matrix '" + name + "'");
  return it->second;
}

void write_checkpoint(const Checkpoint& checkpoint, std::ostream& out) {
  out << kMagic << ' ' << kVersion << '\n';
  out << "kind " << checkpoint.kind << '\n';
  out << "dims " << checkpoint.d << ' ' << checkpoint.dprime << ' ' << checkpoint.h << ' ' << checkpoint.o << '\n';
  for (const auto& [name, value] : checkpoint.scalars) out << "scalar " << name << ' ' << format_exact(value) << '\n';
  for (const auto& [name, m] : checkpoint.matrices) {
    out << "matrix " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
      auto row = m.row(r);
      for (std::size_t c = 0; c < row.size(); ++c) out << (c ? " " : "") << format_exact(row[c]);
      out << '\n';
    }
  }
  out << "end\n";
}

Checkpoint read_checkpoint(std::istream& in) {
  Checkpoint cp;
  std::string line;
  std::size_t line_no = 0;
  auto next = [&]() -> std::vector<std::string_view> {
    while (std::getline(in, line)) {
      ++line_no;
      auto fields = split_whitespace(line);
      if (!fields.empty()) return fields;
    }
    throw FormatError(line_no, "checkpoint: unexpected end of file");
  };
  auto size_field = [&](std::string_view s) {
    auto v = parse_size(s);
    if (!v) throw FormatError(line_no, "checkpoint: expected a count, got '" + std::string(s) + "'");
    return *v;
  };

  auto header = next();
  if (header.size() != 2 || header[0] != kMagic) throw FormatError(line_no, "checkpoint: bad magic line");
  if (size_field(header[1]) != kVersion) throw FormatError(line_no, "checkpoint: unsupported version");

  auto kind = next();
  if (kind.size() != 2 || kind[0] != "kind") throw FormatError(line_no, "checkpoint: expected 'kind <tag>'");
  cp.kind = std::string(kind[1]);

  auto dims = next();
  if (dims.size() != 5 || dims[0] != "dims") throw FormatError(line_no, "checkpoint: expected 'dims d d' h o'");
  cp.d = size_field(dims[1]);
  cp.dprime = size_field(dims[2]);
  cp.h = size_field(dims[3]);
  cp.o = size_field(dims[4]);

  for (;;) {
    auto fields = next();
    if (fields[0] == "end") break;
    if (fields[0] == "scalar") {
      if (fields.size() != 3) throw FormatError(line_no, "checkpoint: expected 'scalar <name> <value>'");
      auto value = parse_double(fields[2]);
      if (!value) throw FormatError(line_no, "checkpoint: invalid scalar value");
      cp.scalars[std::string(fields[1])] = *value;
      continue;
    }
    if (fields[0] != "matrix" || fields.size() != 4) {
      throw FormatError(line_no, "checkpoint: expected 'matrix <name> <rows> <cols>'");
    }
    const std::string name(fields[1]);
    const std::size_t rows = size_field(fields[2]);
    const std::size_t cols = size_field(fields[3]);
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
      auto values = cols == 0 ? std::vector<std::string_view>{} : next();
      if (values.size() != cols) {
        throw FormatError(line_no, "checkpoint: matrix '" + name + "' row has " + std::to_string(values.size()) +
                                       " values, expected " + std::to_string(cols));
      }
      for (std::size_t c = 0; c < cols; ++c) {
        auto v = parse_double(values[c]);
        if (!v) throw FormatError(line_no, "checkpoint: invalid number in matrix '" + name + "'");
        m(r, c) = *v;
      }
    }
    cp.matrices[name] = std::move(m);
  }
  return cp;
}

Checkpoint to_checkpoint(const BlseParams& params, std::string kind) {
  Checkpoint cp;
  cp.kind = kind.empty() ? to_string(params.variant) : std::move(kind);
  cp.d = params.source_projection.rows();
  cp.dprime = params.variant == SentenceVariant::shared_projection ? cp.d : params.target_projection.rows();
  cp.h = params.joint_dim();
  cp.o = params.label_count();
  cp.matrices["M"] = params.source_projection;
  if (!params.target_projection.empty()) cp.matrices["Mprime"] = params.target_projection;
  if (!params.classifier.empty()) cp.matrices["P"] = params.classifier;
  return cp;
}

Checkpoint to_checkpoint(const TargetedParams& params) {
  Checkpoint cp;
  cp.kind = to_string(params.variant);
  cp.d = params.source_projection.rows();
  cp.dprime = params.target_projection.rows();
  cp.h = params.joint_dim();
  cp.o = params.label_count();
  cp.matrices["M"] = params.source_projection;
  cp.matrices["Mprime"] = params.target_projection;
  cp.matrices["T"] = params.classifier;
  cp.matrices["shared_target"] = params.shared_target;
  return cp;
}

Checkpoint to_checkpoint(const MappingMatrix& mapping) {
  Checkpoint cp;
  cp.kind = "mapping";
  cp.d = mapping.weights.rows();
  cp.dprime = mapping.weights.cols();
  cp.scalars["fit_residual"] = mapping.fit_residual;
  cp.matrices["W"] = mapping.weights;
  return cp;
}

BlseParams blse_from_checkpoint(const Checkpoint& cp) {
  BlseParams p;
  if (cp.kind == "sentence" || cp.kind == "sent") {
    p.variant = SentenceVariant::blse;
  } else if (cp.kind == "no-mprime") {
    p.variant = SentenceVariant::shared_projection;
  } else if (cp.kind == "no-proj") {
    p.variant = SentenceVariant::no_projection;
  } else {
    throw FormatError("checkpoint: kind '" + cp.kind + "' is not a sentence-level model");
  }
  p.source_projection = cp.matrix("M");
  if (p.variant != SentenceVariant::shared_projection) p.target_projection = cp.matrix("Mprime");
  if (p.variant != SentenceVariant::no_projection) {
    p.classifier = cp.matrix("P");
    if (p.classifier.rows() != p.joint_dim()) throw FormatError("checkpoint: P rows differ from joint dimension");
  }
  if (!p.target_projection.empty() && p.target_projection.cols() != p.joint_dim()) {
    throw FormatError("checkpoint: M and Mprime disagree on the joint dimension");
  }
  return p;
}

bool is_targeted_kind(const std::string& kind) {
  return kind == "split" || kind == "target-only" || kind == "context-only";
}

TargetedParams targeted_from_checkpoint(const Checkpoint& cp) {
  TargetedParams p;
  if (cp.kind == "split") {
    p.variant = TargetedVariant::split;
  } else if (cp.kind == "target-only") {
    p.variant = TargetedVariant::target_only;
  } else if (cp.kind == "context-only") {
    p.variant = TargetedVariant::context_only;
  } else {
    throw FormatError("checkpoint: kind '" + cp.kind + "' is not a targeted model");
  }
  p.source_projection = cp.matrix("M");
  p.target_projection = cp.matrix("Mprime");
  p.classifier = cp.matrix("T");
  p.shared_target = cp.matrix("shared_target");
  if (p.classifier.rows() != 3 * p.joint_dim()) throw FormatError("checkpoint: T rows must be 3h");
  return p;
}

MappingMatrix mapping_from_checkpoint(const Checkpoint& cp) {
  if (cp.kind != "mapping") throw FormatError("checkpoint: kind '" + cp.kind + "' is not a mapping");
  MappingMatrix m;
  m.weights = cp.matrix("W");
  if (auto it = cp.scalars.find("fit_residual"); it != cp.scalars.end()) m.fit_residual = it->second;
  return m;
}

}  // namespace xlsent
