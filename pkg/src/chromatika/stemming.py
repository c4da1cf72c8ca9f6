"""Suffix-stripping stemmer, following the original 1980 formulation of the
Porter algorithm exactly (no later revisions such as the BLI/LOGI rules).

Words are assumed lowercase a-z. Words of length 1 or 2 are returned as-is.
"""

_VOWELS = frozenset("aeiou")


def _is_consonant(word: str, i: int) -> bool:
    ch = word[i]
    if ch in _VOWELS:
        return False
    if ch == "y":
        # y after a consonant acts as a vowel; at word start or after a
        # vowel it is a consonant
        return i == 0 or not _is_consonant(word, i - 1)
    return True


def _measure(stem: str) -> int:
    """Number of vowel->consonant transitions: the m in [C](VC)^m[V]."""
    m = 0
    prev_vowel = False
    for i in range(len(stem)):
        cons = _is_consonant(stem, i)
        if cons and prev_vowel:
            m += 1
        prev_vowel = not cons
    return m


def _has_vowel(stem: str) -> bool:
    return any(not _is_consonant(stem, i) for i in range(len(stem)))


def _ends_double_consonant(word: str) -> bool:
    return (
        len(word) >= 2
        and word[-1] == word[-2]
        and _is_consonant(word, len(word) - 1)
    )


def _ends_cvc(word: str) -> bool:
    if len(word) < 3:
        return False
    if (
        _is_consonant(word, len(word) - 3)
        and not _is_consonant(word, len(word) - 2)
        and _is_consonant(word, len(word) - 1)
    ):
        return word[-1] not in "wxy"
    return False


def _apply_longest(word: str, rules) -> str:
    """Apply the longest-matching suffix rule; if its condition fails, the
    whole step is a no-op (no fallback to shorter suffixes)."""
    best = None
    for suffix, replacement, condition in rules:
        if word.endswith(suffix) and (best is None or len(suffix) > len(best[0])):
            best = (suffix, replacement, condition)
    if best is None:
        return word
    suffix, replacement, condition = best
    stem = word[: len(word) - len(suffix)]
    if condition is None or condition(stem):
        return stem + replacement
    return word


def _m_gt_0(stem: str) -> bool:
    return _measure(stem) > 0


def _m_gt_1(stem: str) -> bool:
    return _measure(stem) > 1


_STEP2 = [
    ("ational", "ate", _m_gt_0),
    ("tional", "tion", _m_gt_0),
    ("enci", "ence", _m_gt_0),
    ("anci", "ance", _m_gt_0),
    ("izer", "ize", _m_gt_0),
    ("abli", "able", _m_gt_0),
    ("alli", "al", _m_gt_0),
    ("entli", "ent", _m_gt_0),
    ("eli", "e", _m_gt_0),
    ("ousli", "ous", _m_gt_0),
    ("ization", "ize", _m_gt_0),
    ("ation", "ate", _m_gt_0),
    ("ator", "ate", _m_gt_0),
    ("alism", "al", _m_gt_0),
    ("iveness", "ive", _m_gt_0),
    ("fulness", "ful", _m_gt_0),
    ("ousness", "ous", _m_gt_0),
    ("aliti", "al", _m_gt_0),
    ("iviti", "ive", _m_gt_0),
    ("biliti", "ble", _m_gt_0),
]

_STEP3 = [
    ("icate", "ic", _m_gt_0),
    ("ative", "", _m_gt_0),
    ("alize", "al", _m_gt_0),
    ("iciti", "ic", _m_gt_0),
    ("ical", "ic", _m_gt_0),
    ("ful", "", _m_gt_0),
    ("ness", "", _m_gt_0),
]

_STEP4_PLAIN = [
    "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement",
    "ment", "ent", "ou", "ism", "ate", "iti", "ous", "ive", "ize",
]


def _step1a(word: str) -> str:
    return _apply_longest(
        word,
        [("sses", "ss", None), ("ies", "i", None), ("ss", "ss", None), ("s", "", None)],
    )


def _step1b(word: str) -> str:
    if word.endswith("eed"):
        stem = word[:-3]
        return stem + "ee" if _measure(stem) > 0 else word
    removed = None
    if word.endswith("ed") and _has_vowel(word[:-2]):
        removed = word[:-2]
    elif word.endswith("ing") and _has_vowel(word[:-3]):
        removed = word[:-3]
    if removed is None:
        return word
    if removed.endswith(("at", "bl", "iz")):
        return removed + "e"
    if _ends_double_consonant(removed) and removed[-1] not in "lsz":
        return removed[:-1]
    if _measure(removed) == 1 and _ends_cvc(removed):
        return removed + "e"
    return removed


def _step1c(word: str) -> str:
    if word.endswith("y") and _has_vowel(word[:-1]):
        return word[:-1] + "i"
    return word


def _step4(word: str) -> str:
    rules = [(s, "", _m_gt_1) for s in _STEP4_PLAIN]
    rules.append(("ion", "", lambda stem: _m_gt_1(stem) and stem.endswith(("s", "t"))))
    return _apply_longest(word, rules)


def _step5a(word: str) -> str:
    if not word.endswith("e"):
        return word
    stem = word[:-1]
    m = _measure(stem)
    if m > 1 or (m == 1 and not _ends_cvc(stem)):
        return stem
    return word


def _step5b(word: str) -> str:
    if word.endswith("l") and _ends_double_consonant(word) and _measure(word) > 1:
        return word[:-1]
    return word


def porter_stem(word: str) -> str:
    if len(word) <= 2:
        return word
    word = _step1a(word)
    word = _step1b(word)
    word = _step1c(word)
    word = _apply_longest(word, _STEP2)
    word = _apply_longest(word, _STEP3)
    word = _step4(word)
    word = _step5a(word)
    word = _step5b(word)
    return word
