#include <algorithm>
#include <sstream>

#include "persist/analysis.hpp"

namespace persist {

std::string emit_persistence_constraints(const AnalysisReport& report, DomainKind domain) {
  auto d = std::find(report.domains.begin(), report.domains.end(), domain);
  if (d == report.domains.end())
    throw ValidationError("domain '" + std::string(domain_name(domain)) + "' was not part of the analysis");
  const auto col = static_cast<std::size_t>(d - report.domains.begin());
  std::ostringstream os;
  for (const auto& sr : report.sets)
    for (const auto& sc : sr.scopes)
      for (const auto& bv : sc.blocks)
        if (bv.accessed && bv.persistent[col])
          os << "m_" << bv.block << '_' << sc.name << " <= entries_" << sc.name << ";\n";
  return os.str();
}

}  // namespace persist
