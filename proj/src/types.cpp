#include "mrc/types.hpp"

#include <set>
#include <stdexcept>

namespace mrc {

std::string VariationSpec::spec_id() const {
    std::string id(to_string(dimension));
    id += ':';
    switch (dimension) {
        case Dimension::Order: {
            if (!order_permutation) throw std::logic_error("order spec without permutation");
            for (size_t i = 0; i < order_permutation->size(); ++i) {
                if (i) id += '.';
                id += std::to_string((*order_permutation)[i]);
            }
            break;
        }
        case Dimension::Phrasing:
            if (!phrasing_setting) throw std::logic_error("phrasing spec without setting");
            id += to_string(*phrasing_setting);
            break;
        case Dimension::Language:
            if (!language) throw std::logic_error("language spec without language");
            id += to_string(*language);
            break;
    }
    if (sample > 0) id += "#s" + std::to_string(sample);
    return id;
}

VariationSpec VariationSpec::order(std::vector<int> permutation, int sample) {
    VariationSpec s;
    s.dimension = Dimension::Order;
    s.order_permutation = std::move(permutation);
    s.sample = sample;
    return s;
}

VariationSpec VariationSpec::phrasing(PhrasingSetting setting, int sample) {
    VariationSpec s;
    s.dimension = Dimension::Phrasing;
    s.phrasing_setting = setting;
    s.sample = sample;
    return s;
}

VariationSpec VariationSpec::lang(Lang language, int sample) {
    VariationSpec s;
    s.dimension = Dimension::Language;
    s.language = language;
    s.sample = sample;
    return s;
}

void SolutionSet::validate() const {
    if (traces.empty()) throw std::invalid_argument("SolutionSet with no traces");
    std::set<std::string> ids;
    for (const auto& t : traces) {
        if (t.problem_id != problem_id)
            throw std::invalid_argument("trace problem_id mismatch in SolutionSet " + problem_id);
        if (!ids.insert(t.spec.spec_id()).second)
            throw std::invalid_argument("duplicate spec_id in SolutionSet: " + t.spec.spec_id());
        if ((t.extraction_status == ExtractionStatus::Ok) != t.extracted_answer.has_value())
            throw std::invalid_argument("extraction status/answer mismatch in " + problem_id);
    }
}

}  // namespace mrc
