#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace kge {

/// Bidirectional mapping between entity/relation names and dense ids.
/// Ids are contiguous and assigned in first-seen order.
class Vocabulary {
public:
    int add_entity(const std::string& name) {
        auto it = entity_ids_.find(name);
        if (it != entity_ids_.end()) return it->second;
        int id = static_cast<int>(entity_names_.size());
        entity_names_.push_back(name);
        entity_ids_.emplace(name, id);
        return id;
    }

    int add_relation(const std::string& name) {
        auto it = relation_ids_.find(name);
        if (it != relation_ids_.end()) return it->second;
        int id = static_cast<int>(relation_names_.size());
        relation_names_.push_back(name);
        relation_ids_.emplace(name, id);
        return id;
    }

    std::optional<int> entity_id(const std::string& name) const {
        auto it = entity_ids_.find(name);
        if (it == entity_ids_.end()) return std::nullopt;
        return it->second;
    }

    std::optional<int> relation_id(const std::string& name) const {
        auto it = relation_ids_.find(name);
        if (it == relation_ids_.end()) return std::nullopt;
        return it->second;
    }

    const std::string& entity_name(int id) const { return entity_names_.at(id); }
    const std::string& relation_name(int id) const { return relation_names_.at(id); }

    int num_entities() const { return static_cast<int>(entity_names_.size()); }
    int num_relations() const { return static_cast<int>(relation_names_.size()); }

    const std::vector<std::string>& entity_names() const { return entity_names_; }
    const std::vector<std::string>& relation_names() const { return relation_names_; }

private:
    std::vector<std::string> entity_names_;
    std::vector<std::string> relation_names_;
    std::unordered_map<std::string, int> entity_ids_;
    std::unordered_map<std::string, int> relation_ids_;
};

}  // namespace kge
