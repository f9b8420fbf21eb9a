"""Reference tables, transcribed by hand.

``OPTIMA_62`` maps ``n -> (rows, stars, delta_index)`` with rows as
``(w, h, hminus, s)``.  ``SEGMENT_ROWS`` carries ``(w, h, hminus, s, v)``
and ``DIMORPHIC_ROWS`` carries ``(w, h, hminus, s)``.
"""

OPTIMA_62 = {
    1: ([(1, 0, 0, 1)], 0, 0),
    2: ([(2, 0, 0, 1)], 0, 0),
    3: ([(2, 2, 1, 0)], 0, 0),
    4: ([(2, 0, 0, 2)], 0, 0),
    5: ([(2, 3, 1, 0)], 0, 0),
    6: ([(3, 0, 0, 2)], 0, 0),
    7: ([(3, 3, 1, 0)], 1, 1),
    8: ([(3, 3, 1, 0)], 0, 0),
    9: ([(3, 0, 0, 3)], 0, 0),
    10: ([(3, 4, 2, 0)], 0, 0),
    11: ([(3, 3, 1, 1), (4, 3, 1, 0)], 0, 0),
    12: ([(4, 0, 0, 3)], 0, 0),
    14: ([(4, 4, 2, 0)], 0, 0),
    15: ([(4, 3, 1, 1)], 0, 0),
    16: ([(4, 0, 0, 4)], 0, 0),
    17: ([(4, 5, 2, 0)], 1, 2),
    18: ([(4, 5, 2, 0)], 0, 0),
    19: ([(4, 3, 1, 2), (5, 3, 1, 1)], 0, 0),
    20: ([(4, 5, 0, 0)], 0, 0),
    22: ([(5, 5, 2, 0)], 1, 2),
    23: ([(5, 5, 2, 0)], 0, 0),
    24: ([(5, 3, 1, 2)], 0, 0),
    25: ([(5, 5, 0, 0)], 0, 0),
    26: ([(5, 6, 3, 0)], 1, 2),
    27: ([(5, 6, 3, 0)], 0, 0),
    28: ([(5, 5, 2, 1), (6, 5, 2, 0)], 0, 0),
    29: ([(5, 3, 1, 3), (6, 3, 1, 2)], 0, 0),
    30: ([(5, 6, 0, 0)], 0, 0),
    32: ([(5, 7, 3, 0)], 0, 0),
    33: ([(6, 6, 3, 0)], 0, 0),
    34: ([(6, 5, 2, 1)], 0, 0),
    35: ([(5, 7, 0, 0)], 0, 0),
    36: ([(6, 6, 0, 0)], 0, 0),
    37: ([(6, 7, 3, 0)], 2, 1),
    38: ([(6, 7, 3, 0)], 1, 3),
    39: ([(6, 7, 3, 0)], 0, 0),
    40: ([(6, 5, 2, 2), (7, 5, 2, 1)], 0, 0),
    41: ([(6, 7, 0, 0)], 1, 2),
    42: ([(6, 7, 0, 0)], 0, 0),
    44: ([(6, 8, 4, 0)], 0, 0),
    45: ([(7, 7, 3, 0)], 1, 3),
    46: ([(7, 7, 3, 0)], 0, 0),
    47: ([(7, 5, 2, 2)], 0, 0),
    48: ([(6, 8, 0, 0)], 0, 0),
    49: ([(7, 7, 0, 0)], 0, 0),
    50: ([(6, 9, 4, 0)], 0, 0),
    51: ([(7, 8, 4, 0)], 1, 3),
    52: ([(7, 8, 4, 0)], 0, 0),
    53: ([(7, 7, 3, 1), (8, 7, 3, 0)], 0, 0),
    54: ([(6, 9, 0, 0)], 0, 0),
    55: ([(7, 8, 0, 0)], 1, 3),
    56: ([(7, 8, 0, 0)], 0, 0),
    58: ([(7, 9, 4, 0)], 1, 4),
    59: ([(7, 9, 4, 0)], 0, 0),
    60: ([(8, 8, 4, 0)], 0, 0),
    61: ([(8, 7, 3, 1)], 0, 0),
    62: ([(7, 9, 0, 0)], 1, 3),
}

IRREGULAR = (13, 21, 31, 43, 57)

SEGMENT_ROWS = {
    101: [(9, 12, 6, 0, 1)],
    102: [(9, 12, 6, 0, 0)],
    103: [(10, 11, 5, 0, 2)],
    104: [(10, 11, 5, 0, 1)],
    105: [(10, 11, 5, 0, 0)],
    106: [(10, 9, 4, 2, 0), (11, 9, 4, 1, 0)],
    107: [(9, 12, 0, 0, 1)],
    108: [(9, 12, 0, 0, 0)],
    109: [(10, 11, 0, 0, 1)],
    110: [(10, 11, 0, 0, 0)],
    251: [(14, 18, 0, 0, 1)],
    252: [(14, 18, 0, 0, 0)],
    253: [(15, 17, 0, 0, 2)],
    254: [(15, 17, 0, 0, 1)],
    255: [(15, 17, 0, 0, 0)],
    256: [(16, 16, 0, 0, 0)],
    257: [(14, 19, 9, 0, 0)],
    258: [(15, 18, 9, 0, 3)],
    259: [(15, 18, 9, 0, 2)],
    260: [(15, 18, 9, 0, 1)],
    501: [(21, 24, 0, 0, 3)],
    502: [(21, 24, 0, 0, 2)],
    503: [(21, 24, 0, 0, 1)],
    504: [(21, 24, 0, 0, 0)],
    505: [(22, 23, 0, 0, 1)],
    506: [(22, 23, 0, 0, 0)],
    507: [(20, 26, 13, 0, 0)],
    508: [(21, 25, 12, 0, 5)],
    509: [(21, 25, 12, 0, 4)],
    510: [(21, 25, 12, 0, 3)],
    511: [(21, 25, 12, 0, 2)],
    1001: [(30, 34, 17, 0, 2)],
    1002: [(30, 34, 17, 0, 1)],
    1003: [(30, 34, 17, 0, 0)],
    1004: [(31, 33, 16, 0, 3)],
    1005: [(31, 33, 16, 0, 2)],
    1006: [(31, 33, 16, 0, 1)],
    1007: [(31, 33, 16, 0, 0)],
    1008: [(28, 36, 0, 0, 0)],
    1009: [(29, 35, 0, 0, 6)],
    1010: [(29, 35, 0, 0, 5)],
    2001: [(44, 46, 23, 0, 0)],
    2002: [(41, 49, 0, 0, 7)],
    2003: [(41, 49, 0, 0, 6)],
    2004: [(41, 49, 0, 0, 5)],
    2005: [(41, 49, 0, 0, 4)],
    2006: [(41, 49, 0, 0, 3)],
    2007: [(41, 49, 0, 0, 2)],
    2008: [(41, 49, 0, 0, 1)],
    2009: [(41, 49, 0, 0, 0)],
    2010: [(42, 48, 0, 0, 6)],
    2011: [(42, 48, 0, 0, 5)],
    4991: [(64, 78, 0, 0, 1)],
    4992: [(64, 78, 0, 0, 0)],
    4993: [(68, 74, 37, 0, 2)],
    4994: [(68, 74, 37, 0, 1)],
    4995: [(68, 74, 37, 0, 0)],
    4996: [(65, 77, 0, 0, 9)],
    4997: [(65, 77, 0, 0, 8)],
    4998: [(65, 77, 0, 0, 7)],
    4999: [(65, 77, 0, 0, 6)],
    5000: [(65, 77, 0, 0, 5)],
}

SEGMENTS = ((101, 110), (251, 260), (501, 511), (1001, 1010), (2001, 2011), (4991, 5000))

DIMORPHIC_ROWS = {
    69: [(8, 7, 3, 2), (9, 7, 3, 1)],
    78: [(9, 7, 3, 2)],
    86: [(9, 9, 4, 1), (10, 9, 4, 0)],
    96: [(10, 9, 4, 1)],
    127: [(11, 11, 5, 1), (12, 11, 5, 0)],
    139: [(12, 11, 5, 1)],
    151: [(12, 11, 5, 2), (13, 11, 5, 1)],
    176: [(13, 13, 6, 1), (14, 13, 6, 0)],
    190: [(14, 13, 6, 1)],
    233: [(15, 15, 7, 1), (16, 15, 7, 0)],
    249: [(16, 15, 7, 1)],
    298: [(17, 17, 8, 1), (18, 17, 8, 0)],
    316: [(18, 17, 8, 1)],
    371: [(19, 19, 9, 1), (20, 19, 9, 0)],
    452: [(21, 21, 10, 1), (22, 21, 10, 0)],
    541: [(23, 23, 11, 1), (24, 23, 11, 0)],
}

DIMORPHIC_UP_TO_62 = (11, 19, 28, 29, 40, 53)
HYBRID_UP_TO_62 = (11, 15, 19, 24, 28, 29, 34, 40, 47, 53, 61)
