#include "einsel/register.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace einsel {

namespace {
constexpr std::size_t kDimGuard = std::size_t{1} << 24;
}

Register::Register(std::vector<Subsystem> subsystems) : subs_(std::move(subsystems)) {
    if (subs_.empty()) throw std::invalid_argument("register: needs at least one subsystem");
    std::set<std::string> seen;
    for (const auto& s : subs_) {
        if (s.label.empty()) throw std::invalid_argument("register: empty label");
        if (s.dim < 2) throw std::invalid_argument("register: subsystem dim must be >= 2: " + s.label);
        if (!seen.insert(s.label).second)
            throw std::invalid_argument("register: duplicate label: " + s.label);
    }
    dim_ = 1;
    for (const auto& s : subs_) {
        if (dim_ > kDimGuard / s.dim)
            throw std::invalid_argument("register: total dimension exceeds 2^24 guard");
        dim_ *= s.dim;
    }
    strides_.assign(subs_.size(), 1);
    for (std::size_t i = subs_.size(); i-- > 1;)
        strides_[i - 1] = strides_[i] * subs_[i].dim;
}

Register Register::qubits(const std::vector<std::string>& labels) {
    std::vector<Subsystem> subs;
    subs.reserve(labels.size());
    for (const auto& l : labels) subs.push_back({l, 2});
    return Register(std::move(subs));
}

bool Register::contains(std::string_view label) const {
    return std::any_of(subs_.begin(), subs_.end(),
                       [&](const Subsystem& s) { return s.label == label; });
}

std::size_t Register::position(std::string_view label) const {
    for (std::size_t i = 0; i < subs_.size(); ++i)
        if (subs_[i].label == label) return i;
    throw std::domain_error("register: unknown label: " + std::string(label));
}

Register Register::subset(const std::vector<std::string>& labels) const {
    if (labels.empty()) throw std::invalid_argument("register subset: empty selection");
    std::set<std::string> want;
    for (const auto& l : labels) {
        position(l);  // validates existence
        if (!want.insert(l).second)
            throw std::invalid_argument("register subset: duplicate label: " + l);
    }
    std::vector<Subsystem> subs;
    for (const auto& s : subs_)
        if (want.count(s.label)) subs.push_back(s);
    return Register(std::move(subs));
}

bool Register::same_layout(const Register& other) const {
    if (subs_.size() != other.subs_.size()) return false;
    for (std::size_t i = 0; i < subs_.size(); ++i)
        if (subs_[i].label != other.subs_[i].label || subs_[i].dim != other.subs_[i].dim)
            return false;
    return true;
}

std::vector<std::string> Register::labels() const {
    std::vector<std::string> out;
    out.reserve(subs_.size());
    for (const auto& s : subs_) out.push_back(s.label);
    return out;
}

Partition::Partition(const Register& reg, std::vector<std::vector<std::string>> blocks)
    : blocks_(std::move(blocks)) {
    if (blocks_.empty()) throw std::invalid_argument("partition: no blocks");
    std::set<std::string> seen;
    std::size_t total = 0;
    for (const auto& block : blocks_) {
        if (block.empty()) throw std::invalid_argument("partition: empty block");
        for (const auto& l : block) {
            reg.position(l);  // validates existence
            if (!seen.insert(l).second)
                throw std::invalid_argument("partition: label in more than one block: " + l);
            ++total;
        }
    }
    if (total != reg.count())
        throw std::invalid_argument("partition: blocks must cover the register exactly");
}

}  // namespace einsel
