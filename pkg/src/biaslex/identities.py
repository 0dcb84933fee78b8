"""Domain types for the fixed evaluation grid.

The grid is not user-extensible: 2 religions x 2 genders x 4 marital
statuses x 3 child counts = 48 identities, 3 applications (story prompts
fan out over 4 locations), 10 languages in 2 families, and 3 prompting
methods.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import product


class Religion(enum.Enum):
    HINDU = "hindu"
    MUSLIM = "muslim"

    @property
    def label(self) -> str:
        return self.value.capitalize()


class Gender(enum.Enum):
    MALE = "male"
    FEMALE = "female"

    @property
    def label(self) -> str:
        return self.value.capitalize()


class MaritalStatus(enum.Enum):
    MARRIED = "married"
    DIVORCED = "divorced"
    WIDOWED = "widowed"
    SINGLE = "single"

    @property
    def label(self) -> str:
        return self.value.capitalize()


class Children(enum.Enum):
    NO_CHILDREN = "no_children"
    ONE_CHILD = "one_child"
    MANY_CHILDREN = "many_children"

    @property
    def label(self) -> str:
        # "no_children" -> "No children"
        return self.value.replace("_", " ").capitalize()


@dataclass(frozen=True)
class Identity:
    """One intersection of the four identity dimensions."""

    religion: Religion
    gender: Gender
    marital_status: MaritalStatus
    children: Children

    def to_json_dict(self) -> dict[str, str]:
        return {
            "religion": self.religion.value,
            "gender": self.gender.value,
            "marital_status": self.marital_status.value,
            "children": self.children.value,
        }

    @classmethod
    def from_json_dict(cls, data: dict[str, str]) -> "Identity":
        return cls(
            religion=Religion(data["religion"]),
            gender=Gender(data["gender"]),
            marital_status=MaritalStatus(data["marital_status"]),
            children=Children(data["children"]),
        )


def enumerate_identities() -> list[Identity]:
    """All 48 identities in canonical order.

    Order is lexicographic over (religion, gender, marital status,
    children), each dimension in its declaration order; the first element
    is (Hindu, Male, Married, No children).
    """
    return [
        Identity(r, g, m, c)
        for r, g, m, c in product(Religion, Gender, MaritalStatus, Children)
    ]


_IDENTITY_INDEX = {identity: i for i, identity in enumerate(enumerate_identities())}


def identity_order(identity: Identity) -> int:
    """Position of ``identity`` in the canonical enumeration."""
    return _IDENTITY_INDEX[identity]


class ApplicationKind(enum.Enum):
    TODO_LIST = "todo_list"
    HOBBIES_VALUES = "hobbies_values"
    STORY = "story"


class StoryLocation(enum.Enum):
    HOME = "home"
    SCHOOL = "school"
    WORKPLACE = "workplace"
    HOSPITAL = "hospital"


@dataclass(frozen=True)
class Application:
    """A generation task; story tasks carry one of four locations."""

    kind: ApplicationKind
    story_location: StoryLocation | None = None

    def __post_init__(self) -> None:
        if self.kind is not ApplicationKind.STORY and self.story_location is not None:
            raise ValueError(
                f"story_location is only valid for story applications, "
                f"got {self.kind.value!r}"
            )

    def to_json_dict(self) -> dict[str, str]:
        data = {"kind": self.kind.value}
        if self.story_location is not None:
            data["story_location"] = self.story_location.value
        return data

    @classmethod
    def from_json_dict(cls, data: dict[str, str]) -> "Application":
        location = data.get("story_location")
        return cls(
            kind=ApplicationKind(data["kind"]),
            story_location=StoryLocation(location) if location else None,
        )


def iter_applications() -> list[Application]:
    """The six per-identity prompt cells: to-do, hobbies, and 4 story locations."""
    cells = [
        Application(ApplicationKind.TODO_LIST),
        Application(ApplicationKind.HOBBIES_VALUES),
    ]
    cells.extend(Application(ApplicationKind.STORY, loc) for loc in StoryLocation)
    return cells


class LanguageFamily(enum.Enum):
    INDO_ARYAN = "indo_aryan"
    DRAVIDIAN = "dravidian"

    @property
    def label(self) -> str:
        return "Indo-Aryan" if self is LanguageFamily.INDO_ARYAN else "Dravidian"


class Language(enum.Enum):
    HINDI = "hindi"
    URDU = "urdu"
    BENGALI = "bengali"
    PUNJABI = "punjabi"
    MARATHI = "marathi"
    GUJARATI = "gujarati"
    TELUGU = "telugu"
    KANNADA = "kannada"
    MALAYALAM = "malayalam"
    TAMIL = "tamil"

    @property
    def label(self) -> str:
        return self.value.capitalize()

    @property
    def family(self) -> LanguageFamily:
        return _FAMILIES[self]


_FAMILIES = {
    Language.HINDI: LanguageFamily.INDO_ARYAN,
    Language.URDU: LanguageFamily.INDO_ARYAN,
    Language.BENGALI: LanguageFamily.INDO_ARYAN,
    Language.PUNJABI: LanguageFamily.INDO_ARYAN,
    Language.MARATHI: LanguageFamily.INDO_ARYAN,
    Language.GUJARATI: LanguageFamily.INDO_ARYAN,
    Language.TELUGU: LanguageFamily.DRAVIDIAN,
    Language.KANNADA: LanguageFamily.DRAVIDIAN,
    Language.MALAYALAM: LanguageFamily.DRAVIDIAN,
    Language.TAMIL: LanguageFamily.DRAVIDIAN,
}


def language_family(language: Language) -> LanguageFamily:
    return language.family


class PromptMethod(enum.Enum):
    ORIGINAL = "original"
    SIMPLE_DEBIAS = "simple"
    COMPLEX_DEBIAS = "complex"

    @property
    def is_debias(self) -> bool:
        return self is not PromptMethod.ORIGINAL
