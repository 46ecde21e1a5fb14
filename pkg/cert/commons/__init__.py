import os
import sys
import logging
import contextlib
import tempfile as tf
from fractions import Fraction

from cert.exceptions import CertError

logger = logging.getLogger(__name__)

def rational(s):
    '''
    Parse a rational number written as an integer, ``a/b``, or a finite
    decimal. Fractions are passed through.

    Example::
        >>> from cert.commons import rational
        >>> rational('1/3')
        Fraction(1, 3)
        >>> rational('0.25')
        Fraction(1, 4)

    :param s: Rational literal
    :type s: str|int|Fraction
    :returns: Exact rational
    :rtype: fractions.Fraction
    '''
    if isinstance(s, Fraction):
        return s
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, float):
        raise TypeError('floats are not exact; pass a string instead')
    try:
        return Fraction(str(s).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f'not a rational literal: {s!r}') from e

def render_rational(q):
    '''
    Render a rational as ``p/q``, or ``p`` when integral.
    '''
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f'{q.numerator}/{q.denominator}'

def rational_json(q):
    '''
    Serialize a rational for JSON reports.

    :param q: Rational
    :type q: fractions.Fraction
    :returns: ``{"num": ..., "den": ..., "float": ...}``
    :rtype: dict
    '''
    q = Fraction(q)
    return {
        'num': q.numerator,
        'den': q.denominator,
        'float': float(q)
    }

@contextlib.contextmanager
def recursion_limit(limit):
    '''
    Temporarily raise the interpreter recursion limit. The limit is never
    lowered below its current value.

    :param limit: Requested limit
    :type limit: int
    '''
    previous = sys.getrecursionlimit()
    if limit > previous:
        logger.debug('raising recursion limit %s -> %s', previous, limit)
        sys.setrecursionlimit(limit)
    try:
        yield
    finally:
        sys.setrecursionlimit(previous)

def atomic_write(filename, content, overwrite=True, permissions=0o0644, encoding='utf-8'):
    '''
    Write a file atomically by writing the file content to a
    temporary location first, then renaming the file.

    :param filename: Filename
    :type filename: str
    :param content: File content
    :type content: str|bytes
    :param overwrite: Overwrite
    :type overwrite: bool
    :param permissions: Octal permissions
    :type permissions: octal
    '''
    filename = os.path.expanduser(filename)
    if not overwrite and os.path.exists(filename):
        raise WriteError(f'file already exists: {filename}')
    dirname = os.path.dirname(os.path.abspath(filename))
    with tf.NamedTemporaryFile(dir=dirname, prefix='.', delete=False) as tmp:
        if encoding and isinstance(content, str):
            logger.debug('writing string content with encoding %s', encoding)
            tmp.write(content.encode(encoding))
        else:
            tmp.write(content)
        tmp.flush()
        os.fsync(tmp.fileno())
    os.chmod(tmp.name, permissions)
    os.replace(tmp.name, filename)

class WriteError(CertError):
    pass
