"""
Schemas for code metrics and the encoded feature vector
"""

from enum import Enum
from typing import List

from pydantic import BaseModel, Field, NonNegativeInt, field_validator

METHOD_METRIC_NAMES = (
    "CBO", "WMC", "RFC", "SLOC", "parametersQty", "variablesQty", "returnsQty",
    "loopQty", "comparisonsQty", "maxNestedBlocksQty", "anonymousClassesQty",
    "innerClassesQty", "lambdasQty", "uniqueWordsQty", "numbersQty",
    "assignmentsQty", "mathOperationsQty", "stringLiteralsQty",
    "parenthesizedExpsQty", "methodsInvokedQty", "methodsInvokedLocalQty",
    "methodsInvokedIndirectLocalQty", "NOSI",
)

CLASS_METRIC_NAMES = (
    "CBO", "DIT", "WMC", "RFC", "LCOM", "NOSI", "SLOC", "loopQty",
    "comparisonsQty", "maxNestedBlocksQty", "anonymousClassesQty",
    "innerClassesQty", "lambdasQty", "uniqueWordsQty", "numbersQty",
    "assignmentsQty", "mathOperationsQty", "stringLiteralsQty",
    "parenthesizedExpsQty", "variablesQty", "returnsQty", "totalMethodsQty",
    "staticMethodsQty", "publicMethodsQty", "privateMethodsQty",
    "protectedMethodsQty", "defaultMethodsQty", "abstractMethodsQty",
    "finalMethodsQty", "synchronizedMethodsQty", "totalFieldsQty",
    "staticFieldsQty", "publicFieldsQty", "privateFieldsQty",
    "protectedFieldsQty", "defaultFieldsQty", "finalFieldsQty",
    "visibleFieldsQty",
)


class ClassType(str, Enum):
    """Kind of the enclosing type declaration"""
    CLASS = "class"
    INNER_CLASS = "inner_class"
    INTERFACE = "interface"
    ENUM_TYPE = "enum_type"
    ANONYMOUS = "anonymous"


class MethodMetrics(BaseModel):
    """Method-scope metrics computed on a log-free method"""
    CBO: NonNegativeInt = 0
    WMC: NonNegativeInt = 1
    RFC: NonNegativeInt = 0
    SLOC: NonNegativeInt = 0
    parametersQty: NonNegativeInt = 0
    variablesQty: NonNegativeInt = 0
    returnsQty: NonNegativeInt = 0
    loopQty: NonNegativeInt = 0
    comparisonsQty: NonNegativeInt = 0
    maxNestedBlocksQty: NonNegativeInt = 0
    anonymousClassesQty: NonNegativeInt = 0
    innerClassesQty: NonNegativeInt = 0
    lambdasQty: NonNegativeInt = 0
    uniqueWordsQty: NonNegativeInt = 0
    numbersQty: NonNegativeInt = 0
    assignmentsQty: NonNegativeInt = 0
    mathOperationsQty: NonNegativeInt = 0
    stringLiteralsQty: NonNegativeInt = 0
    parenthesizedExpsQty: NonNegativeInt = 0
    methodsInvokedQty: NonNegativeInt = 0
    methodsInvokedLocalQty: NonNegativeInt = 0
    methodsInvokedIndirectLocalQty: NonNegativeInt = 0
    NOSI: NonNegativeInt = 0
    isConstructor: bool = False

    def numeric_values(self) -> List[float]:
        return [float(getattr(self, name)) for name in METHOD_METRIC_NAMES]


class ClassMetrics(BaseModel):
    """Class-scope metrics computed on a log-free type declaration"""
    CBO: NonNegativeInt = 0
    DIT: int = Field(default=1, ge=1)
    WMC: NonNegativeInt = 0
    RFC: NonNegativeInt = 0
    LCOM: NonNegativeInt = 0
    NOSI: NonNegativeInt = 0
    SLOC: NonNegativeInt = 0
    loopQty: NonNegativeInt = 0
    comparisonsQty: NonNegativeInt = 0
    maxNestedBlocksQty: NonNegativeInt = 0
    anonymousClassesQty: NonNegativeInt = 0
    innerClassesQty: NonNegativeInt = 0
    lambdasQty: NonNegativeInt = 0
    uniqueWordsQty: NonNegativeInt = 0
    numbersQty: NonNegativeInt = 0
    assignmentsQty: NonNegativeInt = 0
    mathOperationsQty: NonNegativeInt = 0
    stringLiteralsQty: NonNegativeInt = 0
    parenthesizedExpsQty: NonNegativeInt = 0
    variablesQty: NonNegativeInt = 0
    returnsQty: NonNegativeInt = 0
    totalMethodsQty: NonNegativeInt = 0
    staticMethodsQty: NonNegativeInt = 0
    publicMethodsQty: NonNegativeInt = 0
    privateMethodsQty: NonNegativeInt = 0
    protectedMethodsQty: NonNegativeInt = 0
    defaultMethodsQty: NonNegativeInt = 0
    abstractMethodsQty: NonNegativeInt = 0
    finalMethodsQty: NonNegativeInt = 0
    synchronizedMethodsQty: NonNegativeInt = 0
    totalFieldsQty: NonNegativeInt = 0
    staticFieldsQty: NonNegativeInt = 0
    publicFieldsQty: NonNegativeInt = 0
    privateFieldsQty: NonNegativeInt = 0
    protectedFieldsQty: NonNegativeInt = 0
    defaultFieldsQty: NonNegativeInt = 0
    finalFieldsQty: NonNegativeInt = 0
    visibleFieldsQty: NonNegativeInt = 0
    classType: ClassType = ClassType.CLASS

    def numeric_values(self) -> List[float]:
        return [float(getattr(self, name)) for name in CLASS_METRIC_NAMES]


class FeatureDescriptor(BaseModel):
    """One column of the canonical feature schema"""
    name: str
    scope: str = Field(..., description="method or class")
    metric: str
    kind: str = Field(..., description="numeric or one_hot")


class FeatureSchema(BaseModel):
    """Canonical ordered list of feature columns"""
    version: int
    features: List[FeatureDescriptor]
    schema_hash: str

    @property
    def names(self) -> List[str]:
        return [feature.name for feature in self.features]


class FeatureVector(BaseModel):
    """Encoded row of the dataset"""
    file_path: str
    class_fqn: str
    signature: str
    values: List[float]
    label: bool

    @field_validator("values")
    @classmethod
    def validate_non_negative(cls, v):
        if any(value < 0 for value in v):
            raise ValueError("feature values must be non-negative")
        return v

    @property
    def identity(self):
        return (self.file_path, self.class_fqn, self.signature)
