"""Data module - survey microdata and county vaccination-rate tables"""

from .survey import (
    SurveyRecord,
    SurveyDataset,
    DesignMatrix,
    parse_survey,
    encode_design,
    decode_row,
    write_survey,
    response_balance,
)
from .county import CountyRateTable, parse_county_rates

__all__ = [
    'SurveyRecord',
    'SurveyDataset',
    'DesignMatrix',
    'parse_survey',
    'encode_design',
    'decode_row',
    'write_survey',
    'response_balance',
    'CountyRateTable',
    'parse_county_rates',
]
