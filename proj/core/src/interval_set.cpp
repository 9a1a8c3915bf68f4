#include "xkm/interval_set.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace xkm {

bool Interval::contains(double v) const {
    if (empty()) return false;
    bool above = lo_closed ? v >= lo : v > lo;
    bool below = hi_closed ? v <= hi : v < hi;
    return above && below;
}

namespace {

Interval intersect(const Interval& a, const Interval& b) {
    Interval r;
    if (a.lo > b.lo) {
        r.lo = a.lo;
        r.lo_closed = a.lo_closed;
    } else if (a.lo < b.lo) {
        r.lo = b.lo;
        r.lo_closed = b.lo_closed;
    } else {
        r.lo = a.lo;
        r.lo_closed = a.lo_closed && b.lo_closed;
    }
    if (a.hi < b.hi) {
        r.hi = a.hi;
        r.hi_closed = a.hi_closed;
    } else if (a.hi > b.hi) {
        r.hi = b.hi;
        r.hi_closed = b.hi_closed;
    } else {
        r.hi = a.hi;
        r.hi_closed = a.hi_closed && b.hi_closed;
    }
    return r;
}

}  // namespace

IntervalSet::IntervalSet(std::vector<Interval> parts) {
    for (const Interval& iv : parts)
        if (!iv.empty()) parts_.push_back(iv);
    normalize();
}

void IntervalSet::insert(Interval iv) {
    if (iv.empty()) return;
    parts_.push_back(iv);
    normalize();
}

void IntervalSet::normalize() {
    std::sort(parts_.begin(), parts_.end(), [](const Interval& a, const Interval& b) {
        if (a.lo != b.lo) return a.lo < b.lo;
        return a.lo_closed && !b.lo_closed;
    });
    std::vector<Interval> merged;
    merged.reserve(parts_.size());
    for (const Interval& cur : parts_) {
        if (!merged.empty()) {
            Interval& last = merged.back();
            bool touches = cur.lo < last.hi || (cur.lo == last.hi && (last.hi_closed || cur.lo_closed));
            if (touches) {
                if (cur.hi > last.hi) {
                    last.hi = cur.hi;
                    last.hi_closed = cur.hi_closed;
                } else if (cur.hi == last.hi) {
                    last.hi_closed = last.hi_closed || cur.hi_closed;
                }
                continue;
            }
        }
        merged.push_back(cur);
    }
    parts_ = std::move(merged);
}

IntervalSet IntervalSet::united(const IntervalSet& other) const {
    std::vector<Interval> all = parts_;
    all.insert(all.end(), other.parts_.begin(), other.parts_.end());
    return IntervalSet(std::move(all));
}

IntervalSet IntervalSet::intersected(const Interval& window) const {
    IntervalSet out;
    for (const Interval& c : parts_) {
        Interval r = intersect(c, window);
        if (!r.empty()) out.parts_.push_back(r);
    }
    return out;
}

IntervalSet IntervalSet::complement_within(double a, double b) const {
    if (!(a < b)) throw std::invalid_argument("complement_within: need a < b");
    IntervalSet inside = intersected(Interval::open(a, b));
    IntervalSet out;
    double start = a;
    bool start_closed = false;
    for (const Interval& c : inside.parts_) {
        Interval gap{start, c.lo, start_closed, !c.lo_closed};
        if (!gap.empty()) out.parts_.push_back(gap);
        start = c.hi;
        start_closed = !c.hi_closed;
    }
    Interval tail{start, b, start_closed, false};
    if (!tail.empty()) out.parts_.push_back(tail);
    return out;
}

bool IntervalSet::contains(double v) const {
    auto it = std::upper_bound(parts_.begin(), parts_.end(), v,
                               [](double x, const Interval& iv) { return x < iv.lo; });
    if (it == parts_.begin()) return false;
    return std::prev(it)->contains(v);
}

double IntervalSet::measure() const {
    double s = 0.0;
    for (const Interval& c : parts_) s += c.length();
    return s;
}

std::vector<double> IntervalSet::representatives() const {
    std::vector<double> out;
    out.reserve(parts_.size());
    for (const Interval& c : parts_) out.push_back(c.lo + (c.hi - c.lo) / 2);
    return out;
}

std::string IntervalSet::to_string() const {
    std::ostringstream os;
    os.precision(17);
    os << '{';
    for (std::size_t i = 0; i < parts_.size(); ++i) {
        const Interval& c = parts_[i];
        if (i) os << ", ";
        os << (c.lo_closed ? '[' : '(') << c.lo << ", " << c.hi << (c.hi_closed ? ']' : ')');
    }
    os << '}';
    return os.str();
}

}  // namespace xkm
