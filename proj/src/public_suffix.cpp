#include "iotl/public_suffix.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include "iotl/errors.hpp"

namespace iotl {

namespace {

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

std::vector<std::string_view> split_labels(std::string_view host) {
    std::vector<std::string_view> labels;
    std::size_t start = 0;
    while (start <= host.size()) {
        std::size_t dot = host.find('.', start);
        if (dot == std::string_view::npos) {
            labels.push_back(host.substr(start));
            break;
        }
        labels.push_back(host.substr(start, dot - start));
        start = dot + 1;
    }
    return labels;
}

// A compact ICANN subset covering the suffixes seen in IoT traffic corpora.
// Deployments with exotic TLDs should load the full list via from_file().
constexpr const char* kBundledRules = R"(
// generic
com
net
org
edu
gov
mil
int
info
biz
name
io
co
me
tv
cc
us
app
dev
cloud
online
site
tech
store
xyz
arpa
in-addr.arpa
ip6.arpa
// country suffixes with second-level registrations
uk
co.uk
org.uk
ac.uk
gov.uk
net.uk
au
com.au
net.au
org.au
jp
co.jp
ne.jp
or.jp
ac.jp
cn
com.cn
net.cn
org.cn
kr
co.kr
or.kr
br
com.br
net.br
org.br
ru
in
co.in
net.in
org.in
nz
co.nz
net.nz
org.nz
za
co.za
il
co.il
org.il
de
fr
nl
it
es
se
no
fi
dk
pl
com.pl
ch
at
be
eu
ca
mx
com.mx
tw
com.tw
hk
com.hk
sg
com.sg
// wildcard + exception exercise (per the publicsuffix.org format)
ck
*.ck
!www.ck
)";

}  // namespace

PublicSuffixList PublicSuffixList::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open public suffix list", path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str());
}

PublicSuffixList PublicSuffixList::from_text(std::string_view text) {
    PublicSuffixList psl;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line =
            eol == std::string_view::npos ? text.substr(pos) : text.substr(pos, eol - pos);
        // trim
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
            line.remove_suffix(1);
        while (!line.empty() && (line.front() == ' ' || line.front() == '\t'))
            line.remove_prefix(1);
        if (!line.empty() && line.substr(0, 2) != "//") psl.add_rule(line);
        if (eol == std::string_view::npos) break;
        pos = eol + 1;
    }
    return psl;
}

const PublicSuffixList& PublicSuffixList::bundled() {
    static const PublicSuffixList psl = from_text(kBundledRules);
    return psl;
}

void PublicSuffixList::add_rule(std::string_view rule) {
    RuleKind kind = RuleKind::Normal;
    if (!rule.empty() && rule.front() == '!') {
        kind = RuleKind::Exception;
        rule.remove_prefix(1);
    } else if (rule.size() >= 2 && rule.substr(0, 2) == "*.") {
        kind = RuleKind::Wildcard;
        rule.remove_prefix(2);
    }
    if (rule.empty()) return;
    rules_[to_lower(rule)] = kind;
}

std::string PublicSuffixList::registrable_domain(std::string_view host) const {
    std::string lowered = to_lower(host);
    if (!lowered.empty() && lowered.back() == '.') lowered.pop_back();
    if (lowered.empty()) return lowered;

    const std::vector<std::string_view> labels = split_labels(lowered);
    // Longest matching rule decides the public suffix. An exception rule
    // shortens the suffix by one label; a wildcard lengthens it by one.
    // The implicit "*" rule makes an unlisted TLD its own suffix.
    std::size_t suffix_len = 1;
    for (std::size_t take = 1; take <= labels.size(); ++take) {
        std::string candidate;
        for (std::size_t i = labels.size() - take; i < labels.size(); ++i) {
            if (!candidate.empty()) candidate += '.';
            candidate += labels[i];
        }
        auto it = rules_.find(candidate);
        if (it == rules_.end()) continue;
        switch (it->second) {
            case RuleKind::Normal:
                suffix_len = std::max(suffix_len, take);
                break;
            case RuleKind::Wildcard:
                suffix_len = std::max(suffix_len, take + 1);
                break;
            case RuleKind::Exception:
                // the exception itself is registrable: suffix is one label shorter
                return candidate;
        }
    }
    if (labels.size() <= suffix_len) return lowered;  // the name is a bare suffix
    std::string out;
    for (std::size_t i = labels.size() - suffix_len - 1; i < labels.size(); ++i) {
        if (!out.empty()) out += '.';
        out += labels[i];
    }
    return out;
}

}  // namespace iotl
