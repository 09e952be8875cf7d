#pragma once

#include <string>

#include "json.hpp"
#include "paleylab/inequality_lab.hpp"
#include "paleylab/measures.hpp"
#include "paleylab/riesz.hpp"

namespace paleylab {

// Insertion-ordered, so dumps are byte-stable.
using Json = nlohmann::ordered_json;

// Frequencies: a bare integer for d = 1, an array for d > 1.
Json to_json(const Freq& n);
Freq freq_from_json(const Json& j);
Json to_json(std::span<const Freq> list);
std::vector<Freq> freqs_from_json(const Json& j);

Json to_json(const SetReport& r);
Json to_json(const FreqSetReport& r);
Json to_json(const GridSpec& s);
GridSpec grid_from_json(const Json& j);

// {"half":[..],"coefficients":[[n,re,im],...]}, nonzero entries only
Json to_json(const Spectrum& s);
Spectrum spectrum_from_json(const Json& j);

// {"exponent":e,"coefficients":[[g,num,exp],...]}, each entry reduced
Json to_json(const RieszExpansion& e);

Json to_json(const ProofTrace& t);

Json to_json(const Instance& inst);
Instance instance_from_json(const Json& j);
Json to_json(const Template& t);
Template template_from_json(const Json& j);
Json to_json(const CampaignConfig& c);
CampaignConfig campaign_from_json(const Json& j);
// wall_time only when asked; everything else is deterministic
Json to_json(const CampaignReport& r, bool timing = false);
Json to_json(const Counterexample& c);

Json to_json(const OptimizerResult& r);
std::string optimizer_log_csv(const OptimizerResult& r);

// {"atoms":[{"t":[..],"mass":[re,im]},...]} or {"density":{"grid":..,"spectrum":..}}
Json to_json(const Measure& m);
Measure measure_from_json(const Json& j);
Json to_json(const ChainReport& r);
Json to_json(const LiftedEnumeration& l);
Json to_json(const SimpleSReport& r);
Json to_json(const LiftReport& r);

// Parses text; syntax errors become InvalidInput with the parser's position.
Json parse_json(const std::string& text);
std::string dump(const Json& j);

}  // namespace paleylab
