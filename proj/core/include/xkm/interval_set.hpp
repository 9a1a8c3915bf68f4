#pragma once

#include <string>
#include <vector>

namespace xkm {

/// Interval on the real line with independently open or closed ends.
/// A degenerate interval [a, a] is a single point; (a, a), [a, a) and (a, a]
/// are empty.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool lo_closed = true;
    bool hi_closed = false;

    static Interval open(double a, double b) { return {a, b, false, false}; }
    static Interval closed(double a, double b) { return {a, b, true, true}; }
    static Interval closed_open(double a, double b) { return {a, b, true, false}; }
    static Interval open_closed(double a, double b) { return {a, b, false, true}; }

    bool empty() const { return lo > hi || (lo == hi && !(lo_closed && hi_closed)); }
    double length() const { return empty() ? 0.0 : hi - lo; }
    bool contains(double v) const;
    bool operator==(const Interval&) const = default;
};

/// Finite union of pairwise disjoint intervals kept sorted by left endpoint.
/// Measure ignores endpoint flags; membership honours them.
class IntervalSet {
public:
    IntervalSet() = default;
    explicit IntervalSet(Interval iv) { insert(iv); }
    /// Normalizes an arbitrary (overlapping, unsorted) collection.
    explicit IntervalSet(std::vector<Interval> parts);

    void insert(Interval iv);
    IntervalSet united(const IntervalSet& other) const;
    IntervalSet intersected(const Interval& window) const;
    /// (a, b) minus this set. Requires a < b.
    IntervalSet complement_within(double a, double b) const;

    bool contains(double v) const;
    double measure() const;
    /// One interior value per component: the midpoint (the point itself for
    /// degenerate components).
    std::vector<double> representatives() const;

    const std::vector<Interval>& components() const { return parts_; }
    bool empty() const { return parts_.empty(); }
    std::string to_string() const;

    bool operator==(const IntervalSet&) const = default;

private:
    void normalize();

    std::vector<Interval> parts_;
};

}  // namespace xkm
