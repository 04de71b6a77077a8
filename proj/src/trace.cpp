#include "cloudmarket/trace.hpp"

namespace cloudmarket {

void TraceLog::emit(SimTime time, std::string entity, std::string event,
                    std::vector<std::pair<std::string, std::string>> details) {
    records_.push_back(TraceRecord{time, std::move(entity), std::move(event), std::move(details)});
}

std::string TraceLog::to_csv() const {
    std::string out = "time_us,entity,event,details\n";
    for (const TraceRecord& r : records_) {
        out += std::to_string(r.time.us());
        out += ',';
        out += r.entity;
        out += ',';
        out += r.event;
        out += ',';
        bool first = true;
        for (const auto& [k, v] : r.details) {
            if (!first) {
                out += ';';
            }
            first = false;
            out += k;
            out += '=';
            out += v;
        }
        out += '\n';
    }
    return out;
}

}  // namespace cloudmarket
